from src.database.base import JsonRepository
from src.schema.construct import CandidateSet
from src.schema.measure import AtomicMeasure, SignedMeasure


class MeasureRepository(JsonRepository[AtomicMeasure]):
    def __init__(self):
        super().__init__(AtomicMeasure)


class SignedMeasureRepository(JsonRepository[SignedMeasure]):
    def __init__(self):
        super().__init__(SignedMeasure)


class CandidateRepository(JsonRepository[CandidateSet]):
    def __init__(self):
        super().__init__(CandidateSet)
