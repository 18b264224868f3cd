"""Prime gaps, residue-class coverings and randomized sieve constructions.

Subpackages:
    primes        -- segmented sieving, primorials, prime-gap records
    covering      -- covering engine: exact/greedy Y(x), Jacobsthal, CRT certificates
    construction  -- the four-stage randomized residue-class sieve
    stats         -- singular series, local factors, degree statistics, Monte Carlo
    cli           -- unified command-line front end
"""

__version__ = "0.1.0"
