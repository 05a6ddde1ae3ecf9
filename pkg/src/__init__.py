# sqlab - verification lab for squares of Hamilton paths
