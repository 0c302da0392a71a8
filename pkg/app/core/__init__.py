"""Block-recursive eigensystem of gain-free Lindblad master equations, plus dynamics and a dense oracle."""
