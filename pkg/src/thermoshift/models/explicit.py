from __future__ import division

import numpy as np

from ..errors import ConfigError
from ..potential import LocallyConstantPotential
from ..shift import TransitionStructure
from ..tails import load_tail
from . import Model

GENERATORS = {
    "golden_mean": [[1, 1], [1, 0]],
}


class ExplicitModel(Model):
    """
    A shift given by its 0/1 matrix (or ``"full"``) and a potential constant on 1-cylinders.

    Truncation ``p`` keeps the first ``p + 1`` symbols, so with the default labels 0..m−1 it keeps
    the labels up to ``p``. A tail descriptor marks the symbols as the head of an infinite alphabet.
    """
    type = "explicit"

    def __init__(self, values, matrix=None, labels=None, tail=None, name=None):
        values = np.asarray(values, dtype=float)
        size = len(values)
        if size < 1:
            raise ConfigError("Explicit model needs at least one potential value.")
        labels = list(range(size)) if labels is None else list(labels)
        if len(labels) != size:
            raise ConfigError("Got %s labels for %s potential values." % (len(labels), size))
        if matrix is not None:
            matrix = np.array(matrix, dtype=int)
            if matrix.shape != (size, size) or not np.isin(matrix, (0, 1)).all():
                raise ConfigError("Transition matrix must be a %sx%s 0/1 matrix." % (size, size))
        self.labels = labels
        self.matrix = matrix
        self.max_p = size - 1
        super(ExplicitModel, self).__init__(LocallyConstantPotential(labels, values, tail), name)

    @classmethod
    def from_config(cls, descriptor):
        matrix = descriptor.get("matrix", "full")
        if isinstance(matrix, str):
            if matrix == "full":
                matrix = None
            elif matrix in GENERATORS:
                matrix = GENERATORS[matrix]
            else:
                raise ConfigError("Unknown transition generator %r. Expected 'full' or one of: %s." % (
                    matrix, ", ".join(sorted(GENERATORS))))
        if "phi" in descriptor:
            values = descriptor["phi"]
        elif "probabilities" in descriptor:
            probabilities = np.asarray(descriptor["probabilities"], dtype=float)
            if not (probabilities > 0).all():
                raise ConfigError("Probabilities must be positive.")
            values = np.log(probabilities)
        elif matrix is not None:
            values = np.zeros(len(matrix))
        elif "size" in descriptor:
            values = np.zeros(int(descriptor["size"]))
        else:
            raise ConfigError("Explicit model needs 'phi', 'probabilities', 'size' or a matrix.")
        if "size" in descriptor and int(descriptor["size"]) != len(values):
            raise ConfigError("Size %r does not match %s potential values." % (descriptor["size"], len(values)))
        return cls(values, matrix, descriptor.get("labels"), load_tail(descriptor.get("tail")),
                   descriptor.get("name"))

    def labels_upto(self, p):
        return self.labels[:max(p, -1) + 1]

    def tail_level(self, p):
        return len(self.labels_upto(p))

    def half(self, p):
        if p < 1:
            return None
        return p // 2

    def transitions(self, labels):
        count = len(labels)
        matrix = None if self.matrix is None else self.matrix[:count, :count]
        return TransitionStructure(labels, matrix)

    def as_dict(self):
        return {
            "type": self.type,
            "size": len(self.labels),
            "matrix": "full" if self.matrix is None else self.matrix.tolist(),
            "phi": self.potential.values,
            "tail": None if self.tail is None else self.tail.as_dict(),
        }
