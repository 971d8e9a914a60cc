# Instance and File Generators Package
