# Attacks package init
