from __future__ import absolute_import

import csv
from pathlib import Path

from .errors import OutputError
from .utils import format_float


class CSVReport(object):
    """Fixed-column CSV with floats written at 17 significant digits."""

    def __init__(self, columns, logger):
        self.columns = tuple(columns)
        self.logger = logger

    def render(self, output_file, rows):
        output_file = Path(output_file)
        if not output_file.suffix:
            output_file = output_file.with_suffix('.csv')
        try:
            output_file.parent.mkdir(parents=True, exist_ok=True)
            with output_file.open('w', newline='') as stream:
                writer = csv.writer(stream, lineterminator='\n')
                writer.writerow(self.columns)
                for row in rows:
                    writer.writerow([format_float(row.get(column)) for column in self.columns])
        except OSError as exc:
            raise OutputError("Could not write %s: %s" % (output_file, exc))
        self.logger.info("Generated csv: {0}".format(output_file), bold=True)
        return output_file
