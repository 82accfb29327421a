# ybmarkov: integrable Markov models from set-theoretical Yang-Baxter solutions
