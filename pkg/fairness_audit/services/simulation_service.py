"""
Simulation service: seeded Monte Carlo draws from the hiring model
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Optional

import numpy as np
from django.conf import settings

from ..domain import (
    Dataset,
    DatasetSchema,
    Gender,
    HiringPolicy,
    PhelpsianScenario,
    TraitDimension,
    TraitRole,
)
from ..domain.hiring import SCORES
from ..exceptions import ScenarioError
from .dataset_service import DatasetService
from .hiring_model_service import HiringModelService

logger = logging.getLogger(__name__)

SIMULATED_SCHEMA = DatasetSchema(
    sensitive=(TraitDimension.from_labels('gender', TraitRole.SENSITIVE, [gender.value for gender in Gender]),),
    permissible=(TraitDimension.from_labels('score', TraitRole.PERMISSIBLE, [str(score) for score in SCORES]),),
    outcome='qualified',
    decision='hired',
    weight='count',
)

# gender x score x qualified x hired
CELL_COUNT = len(Gender) * len(SCORES) * 2 * 2


class SimulationService:
    """Service class for drawing synthetic applicant pools"""

    @staticmethod
    def _draw_chunk(size: int, seed: np.random.SeedSequence, parameters: dict) -> np.ndarray:
        """Counts of one chunk over the 24 (gender, score, qualified, hired) cells"""
        rng = np.random.default_rng(seed)
        female = rng.random(size) < parameters['female_share']
        prevalence = np.where(female, parameters['p'][1], parameters['p'][0])
        precision = np.where(female, parameters['phi'][1], parameters['phi'][0])
        muddled_hire = np.where(female, parameters['d'][1], parameters['d'][0])

        qualified = rng.random(size) < prevalence
        informative = rng.random(size) < precision
        score = np.where(informative, np.where(qualified, 3, 1), 2)
        hire_probability = np.where(score == 3, 1.0, np.where(score == 1, 0.0, muddled_hire))
        hired = rng.random(size) < hire_probability

        cell = ((female.astype(np.int64) * 3 + (score - 1)) * 2 + qualified) * 2 + hired
        return np.bincount(cell, minlength=CELL_COUNT)

    @staticmethod
    def simulate(
        scenario: PhelpsianScenario,
        policy: HiringPolicy,
        n: int,
        seed: int,
        female_share: Optional[Fraction] = None,
        threads: Optional[int] = None,
    ) -> Dataset:
        """
        Draw n applicants: gender, then qualification, then test score, then the hiring decision

        Records are split into fixed-size chunks, each with its own child seed spawned from
        `seed`, so the result depends only on (scenario, policy, n, seed, female_share).

        Returns:
            Dataset with one weighted record per non-empty cell, in gender/score/outcome/decision order
        """
        if n < 1:
            raise ScenarioError('n', f"sample count must be at least 1, got {n}")
        share = HiringModelService.default_female_share() if female_share is None else female_share
        if not 0 <= share <= 1:
            raise ScenarioError('gender_split', f"must lie in [0, 1], got {share}")

        genders = (Gender.MALE, Gender.FEMALE)
        parameters = {
            'female_share': float(share),
            'p': [float(scenario.prevalence(gender)) for gender in genders],
            'phi': [float(scenario.precision(gender)) for gender in genders],
            'd': [float(policy.d(gender)) for gender in genders],
        }

        chunk_size = settings.PARITYLENS_SIMULATION_CHUNK_SIZE
        sizes = [chunk_size] * (n // chunk_size) + ([n % chunk_size] if n % chunk_size else [])
        seeds = np.random.SeedSequence(seed).spawn(len(sizes))
        workers = max(1, min(threads or settings.PARITYLENS_THREADS, len(sizes)))
        logger.info(f"Simulating {n} applicants in {len(sizes)} chunks on {workers} workers (seed {seed})")

        totals = np.zeros(CELL_COUNT, dtype=np.int64)
        with ThreadPoolExecutor(max_workers=workers, thread_name_prefix='simulation_worker') as executor:
            for index, counts in enumerate(executor.map(
                lambda job: SimulationService._draw_chunk(job[0], job[1], parameters),
                zip(sizes, seeds),
            )):
                totals += counts
                logger.debug(f"Merged simulation chunk {index + 1}/{len(sizes)}")

        cells = []
        for index, count in enumerate(totals.tolist()):
            rest, hired = divmod(index, 2)
            rest, qualified = divmod(rest, 2)
            gender_index, score_index = divmod(rest, 3)
            cells.append((
                (genders[gender_index].value,),
                (str(SCORES[score_index]),),
                qualified,
                hired,
                count,
            ))
        return DatasetService.from_cells(SIMULATED_SCHEMA, cells)
