from .io import (
    format_value,
    load_matrix_csv,
    load_operator,
    load_partition,
    save_operator,
    save_partition,
    write_matrix_csv,
    write_rows_csv,
)
