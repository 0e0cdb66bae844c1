# Circulant-matrix discrete log cryptosystem
# Finite-field arithmetic, parameter validation, protocols and attack lab
