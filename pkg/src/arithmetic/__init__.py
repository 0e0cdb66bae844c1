# Arithmetic package init
