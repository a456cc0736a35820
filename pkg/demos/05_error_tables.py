"""Relative-error tables from the shipped reference fixtures.

Run: python3 demos/05_error_tables.py
"""

from annulus_bem.coupling_io import fixture_text, read_printed_errors, read_reference_table, relative_error_report

for name in ("table1", "table2"):
    text = fixture_text(name)
    report = relative_error_report(read_reference_table(text))
    print(report.format())
    printed = read_printed_errors(text)
    for k, (mine, theirs) in enumerate(zip(report.row_errors, printed), start=1):
        if f"{mine:.2f}" != f"{theirs:.2f}":
            print(f"  row {k}: computed {mine:.4f}% shows as {mine:.2f}%, reference {theirs:.2f}%")
    print()
