"""Exception types shared across the package."""


class PromptspanError(Exception):
    """Base class for package errors."""


class CorpusError(PromptspanError):
    """Malformed corpus/ontology data or a violated data invariant."""


class PromptError(PromptspanError):
    """Prompt construction or question-bank problems."""


class EmbeddingError(PromptspanError):
    """External embedding file problems (missing entry, wrong dimension)."""


class TrainingDivergence(PromptspanError):
    """Loss became non-finite during training."""

    def __init__(self, epoch: int, batch: int, loss: float):
        self.epoch = epoch
        self.batch = batch
        self.loss = loss
        super().__init__(f"non-finite loss {loss!r} at epoch {epoch}, batch {batch}")


class ZeroVarianceError(PromptspanError):
    """Pearson correlation is undefined because an input has zero variance."""
