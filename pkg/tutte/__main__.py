#!/usr/bin/env python3
"""Main module."""

import tutte

if __name__ == "__main__":
    tutte.main()
