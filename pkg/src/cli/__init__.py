# CLI Package

