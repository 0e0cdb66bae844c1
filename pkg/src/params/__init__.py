# Params package init
