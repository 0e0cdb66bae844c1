# Monitoring package init
