from __future__ import division
from __future__ import print_function

import sys
import warnings

from _pytest._io import TerminalWriter


class ThermoshiftWarning(UserWarning):
    pass


class Logger(object):
    QUIET, NORMAL, VERBOSE = range(3)

    def __init__(self, level=NORMAL, file=None):
        self.level = level
        self.term = TerminalWriter(file=sys.stderr if file is None else file)

    def warn(self, text, warner=None):
        if self.level >= self.VERBOSE:
            self.term.line("")
            self.term.sep("-", red=True, bold=True)
            self.term.write(" WARNING: ", red=True, bold=True)
            self.term.line(text, red=True)
            self.term.sep("-", red=True, bold=True)
        if warner is None:
            warner = warnings.warn
        warner(ThermoshiftWarning(text))

    def error(self, tag, text):
        self.term.line("error[%s]: %s" % (tag, " ".join(str(text).split())), red=True, bold=True)

    def info(self, text, newline=True, **kwargs):
        if self.level >= self.NORMAL:
            if not kwargs or kwargs == {'bold': True}:
                kwargs['purple'] = True
            if newline:
                self.term.line("")
            self.term.line(text, **kwargs)

    def debug(self, text, newline=False, **kwargs):
        if self.level >= self.VERBOSE:
            self.info(text, newline=newline, **kwargs)


_quiet = []


def get_logger(logger=None):
    if logger is not None:
        return logger
    if not _quiet:
        _quiet.append(Logger(Logger.QUIET))
    return _quiet[0]
