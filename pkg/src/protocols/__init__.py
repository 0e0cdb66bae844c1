# Protocols package init
