# formreg Package
