"""
Exact algebra over GF(p): dense linear algebra, graded polynomials, Gröbner
bases and Koszul homology.
"""
