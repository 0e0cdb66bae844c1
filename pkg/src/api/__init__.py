# Api package init
