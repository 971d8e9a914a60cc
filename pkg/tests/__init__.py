# Tests Package

