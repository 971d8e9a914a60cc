# Services Package

