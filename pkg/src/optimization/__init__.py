# Optimization package init
