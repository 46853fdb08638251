"""Quantum-search text features with a linear fusion classifier.

The package simulates an n-qubit register exactly (dense statevector),
amplifies oracle-marked components of an encoded word vector with a
randomized Grover schedule, and feeds the resulting Born-probability
feature vector, concatenated with a frozen classical embedding, into a
linear softmax head trained with RAdam.
"""

__version__ = "0.1.0"
