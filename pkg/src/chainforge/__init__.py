"""chainforge: exact flat norms, slicing, coverings, fillings and systolic
checks for weighted simplicial chains with integer or mod-p coefficients."""

__version__ = "0.1.0"
