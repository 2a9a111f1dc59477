from pathlib import Path

from ..errors import OutputError
from ..utils import safe_dumps


class FileStorage(object):
    """The ``--out`` directory; every artifact of a run is written inside it."""

    def __init__(self, path, logger):
        self.path = Path(path)
        try:
            self.path.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise OutputError("Could not create output directory %s: %s" % (self.path, exc))
        self.path = self.path.resolve()
        self.logger = logger

    def __str__(self):
        return str(self.path)

    def get(self, name):
        target = self.path.joinpath(name).resolve()
        if target.parent != self.path:
            raise OutputError("Refusing to write %r outside of %s." % (name, self.path))
        return target

    def save(self, command, manifest):
        output_file = self.get("%s.json" % command)
        try:
            with output_file.open('wb') as fh:
                fh.write(safe_dumps(manifest, ensure_ascii=True, indent=4, sort_keys=True).encode())
        except OSError as exc:
            raise OutputError("Could not write %s: %s" % (output_file, exc))
        self.logger.info("Saved manifest: %s" % output_file)
        return output_file

    def query(self, pattern="*"):
        return sorted(self.path.glob(pattern))
