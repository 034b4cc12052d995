# Scoring, scenario assembly, metrics and reports
