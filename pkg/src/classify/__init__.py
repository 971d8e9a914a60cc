# Topological Classification Package
