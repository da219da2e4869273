"""Exception types shared across the pipeline."""


class WebsedError(Exception):
    """Base class for all pipeline errors."""


# -- manifests / splits ------------------------------------------------------

class MissingFile(WebsedError):
    pass


class MalformedRow(WebsedError):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class UnknownLabel(WebsedError):
    def __init__(self, label: str, dataset: str):
        super().__init__(f"label {label!r} is not in the {dataset} vocabulary")
        self.label = label
        self.dataset = dataset


class ClassTooSmall(WebsedError):
    def __init__(self, label: str, count: int, minimum: int):
        super().__init__(f"class {label!r} has {count} clips, needs >= {minimum}")
        self.label = label
        self.count = count


# -- audio -------------------------------------------------------------------

class UnreadableFile(WebsedError):
    pass


class UnsupportedEncoding(WebsedError):
    pass


# -- features ----------------------------------------------------------------

class InvalidConfig(WebsedError):
    pass


class InputTooShort(WebsedError):
    pass


class DegenerateStd(WebsedError):
    pass


# -- cnn ---------------------------------------------------------------------

class ShapeMismatch(WebsedError):
    pass


class EmptyTrainingSet(WebsedError):
    pass


class IncompatibleVersion(WebsedError):
    def __init__(self, found: int, supported: int):
        super().__init__(f"model file version {found}, this build reads {supported}")
        self.found = found
        self.supported = supported


class CorruptFile(WebsedError):
    pass


# -- crawl -------------------------------------------------------------------

class FetcherUnavailable(WebsedError):
    pass


# -- evaluation --------------------------------------------------------------

class MissingGroundTruth(WebsedError):
    def __init__(self, segment_id: str):
        super().__init__(f"no ground truth for segment {segment_id!r}")
        self.segment_id = segment_id


class GridMismatch(WebsedError):
    pass


class EmptyTestSet(WebsedError):
    pass


# -- feedback ----------------------------------------------------------------

class NotEnoughEvaluators(WebsedError):
    pass


class UnknownAssignment(WebsedError):
    pass


class DuplicateVote(WebsedError):
    pass


# -- cli ---------------------------------------------------------------------

class BadConfig(WebsedError):
    pass


class MissingInput(WebsedError):
    pass
