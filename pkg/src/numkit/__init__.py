# Numerical Kit Package
