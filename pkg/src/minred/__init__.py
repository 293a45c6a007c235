"""Smallest SL(2,Z)-representatives of binary forms and endomorphisms of P^1."""
