# Graph algorithms and claim harnesses
