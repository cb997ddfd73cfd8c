"""privapi: retrieval-augmented code generation toolkit for private libraries.

Pipeline pieces, composable individually or through the ``privapi`` CLI:

* :mod:`privapi.docstore`     — normalize and serve API documentation records
* :mod:`privapi.corpusforge`  — code-block segmentation, retriever training
  data, API-prompted pretraining documents, resampling weights
* :mod:`privapi.retriever`    — embedding, exact inner-product index, top-k
  queries, retrieval metrics, vote aggregation
* :mod:`privapi.promptkit`    — API-information prompt assembly
* :mod:`privapi.genclient`    — completion-backend client with a scriptable mock
* :mod:`privapi.evalharness`  — sandboxed execution, pass@k, reports
* :mod:`privapi.benchforge`   — pseudo-private benchmark fabrication
* :mod:`privapi.service`      — HTTP service incl. the human-in-the-loop API
"""

__version__ = "0.1.0"
