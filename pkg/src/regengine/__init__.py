# Regularization Engine Package
