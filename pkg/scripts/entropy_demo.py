"""Entropy oracle in both modes on a few hand-picked backends.

Integer halving after a correct circuit loses one bit: allowed once outcomes are
measured, a violation if the map is claimed to be quantum.
"""
from qoracle.circuit import make
from qoracle.core import StateVector
from qoracle.fuzzer.mutants import MutantId, divide_by_two_backend, make_mutant
from qoracle.oracles import Ensemble, check_entropy


def show(label, ensemble, circuit, backend=None):
    v = check_entropy(ensemble, circuit, backend)
    m = v.measured
    mode = "post" if ensemble.post_measurement else "quantum"
    print(f"{label:<28} {mode:<8} H_in={m['entropy_in']:.3f} H_out={m['entropy_out']:.3f}  "
          f"{'PASS' if v.passed else 'FAIL'}")


def main():
    basis = [StateVector.basis(2, i) for i in range(4)]
    quantum, post = Ensemble.uniform(basis), Ensemble.uniform(basis, post_measurement=True)
    ident = make(2, ("id", 0))
    bell = make(2, ("h", 0), ("cx", 0, 1))
    show("bell circuit, correct", quantum, bell)
    show("bell circuit, correct", post, bell)
    show("divide by two", post, ident, divide_by_two_backend())
    show("divide by two", quantum, ident, divide_by_two_backend())
    show("MERGE_FAULT", quantum, ident, make_mutant(MutantId.MERGE_FAULT))


if __name__ == "__main__":
    main()
