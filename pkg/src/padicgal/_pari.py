"""Shared PARI instance."""

import cypari2

pari = cypari2.Pari()
pari.default("debugmem", 0)
pari.default("parisizemax", 1 << 31)
