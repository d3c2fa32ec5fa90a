"""ModTT: a phase-separated module type theory with a lax modality for effects.

Modules:

- :mod:`modtt.core` -- core syntax, substitution and contexts
- :mod:`modtt.equality` -- phase-sensitive judgmental equality by NbE
- :mod:`modtt.checker` -- bidirectional core typechecker
- :mod:`modtt.elaborate` -- surface language elaboration
- :mod:`modtt.phase` -- static parts of signatures and modules
- :mod:`modtt.runtime` -- evaluator with exceptions
- :mod:`modtt.paramtest` -- client-agreement (representation independence) harness
- :mod:`modtt.cli` -- command-line front end
"""

__version__ = "0.1.0"
