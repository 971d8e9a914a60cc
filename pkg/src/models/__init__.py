# Data Models Package

