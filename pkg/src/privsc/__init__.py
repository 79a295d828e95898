"""Private and verifiable smart contracts, desk scale.

Boolean-circuit compilation, Yao garbling with free XOR, base oblivious
transfer, a deterministic simulated network and blockchain, server-aided
outsourcing with offline parties, authenticated-share preprocessing with
cover assignment, and a multi-level contract-verification pipeline.
"""

__version__ = "0.1.0"
