"""
Dataset service: ingestion, serialization and empirical distributions of decision data
"""
import logging
import re
from collections import defaultdict
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Union

import pandas as pd
from pydantic import ValidationError

from ..domain import (
    ColumnRoles,
    Dataset,
    DatasetSchema,
    IndividualRecord,
    JointDistribution,
    Profile,
    RandomizedAlgorithm,
    TraitDimension,
    TraitRole,
)
from ..exceptions import EmptyInputError, ParityLensError, RecordValueError, SchemaError
from ..schemas import DatasetFileSchema, DatasetLayoutSchema, DatasetRecordSchema, TraitSchema

logger = logging.getLogger(__name__)

BINARY_TOKENS = {'0': 0, '1': 1}
MALFORMED_LINE = re.compile(r"line (\d+)")

# (sensitive labels, permissible labels, outcome, decision, count)
Cell = tuple[Profile, Profile, int, int, int]


class DatasetService:
    """Service class for reading, writing and summarizing decision datasets"""

    @staticmethod
    def ingest(path: Union[str, Path], roles: ColumnRoles = None) -> Dataset:
        """Read a dataset, choosing the format from the file extension"""
        if Path(path).suffix.lower() == '.json':
            return DatasetService.ingest_json(path)
        if roles is None:
            raise SchemaError("column roles are required for CSV input")
        return DatasetService.ingest_csv(path, roles)

    @staticmethod
    def ingest_csv(path: Union[str, Path], roles: ColumnRoles) -> Dataset:
        """
        Read a CSV file with a header row into a Dataset

        Args:
            path: CSV file
            roles: which columns are sensitive, permissible, outcome, decision and weight

        Returns:
            Dataset with vocabularies in first-appearance order and row order preserved
        """
        path = Path(path)
        if not path.exists():
            raise ParityLensError(f"file not found: {path}")

        try:
            frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
        except pd.errors.EmptyDataError:
            raise EmptyInputError(f"{path} is empty") from None
        except pd.errors.ParserError as e:
            line = MALFORMED_LINE.search(str(e))
            raise RecordValueError(
                f"malformed record: {str(e).strip().split('C error: ')[-1]}",
                row=int(line.group(1)) if line else None,
            ) from None
        except UnicodeDecodeError as e:
            raise SchemaError(f"{path} is not UTF-8 text (byte {e.start})") from None

        frame.columns = [str(column).strip() for column in frame.columns]
        required = [*roles.sensitive, *roles.permissible, roles.outcome, roles.decision]
        if roles.weight:
            required.append(roles.weight)
        missing = [column for column in required if column not in frame.columns]
        if missing:
            raise SchemaError(f"{path}: missing column(s) {', '.join(missing)}")
        if frame.empty:
            raise EmptyInputError(f"{path} has a header but no records")

        frame = frame[required].apply(lambda column: column.str.strip())

        schema = DatasetSchema(
            sensitive=tuple(
                TraitDimension.from_labels(name, TraitRole.SENSITIVE, frame[name].unique())
                for name in roles.sensitive
            ),
            permissible=tuple(
                TraitDimension.from_labels(name, TraitRole.PERMISSIBLE, frame[name].unique())
                for name in roles.permissible
            ),
            outcome=roles.outcome,
            decision=roles.decision,
            weight=roles.weight,
        )

        records = []
        # Header is line 1, so the first record sits on line 2
        for line, row in enumerate(frame.itertuples(index=False, name=None), start=2):
            values = dict(zip(required, row))
            records.append(DatasetService._record_from_tokens(schema, values, line))

        dataset = Dataset(schema=schema, records=tuple(records))
        logger.info(f"Ingested {path}: {len(records)} rows, n={dataset.n}, {len(dataset.groups)} groups")
        return dataset

    @staticmethod
    def _record_from_tokens(schema: DatasetSchema, values: dict, line: int) -> IndividualRecord:
        def binary(column: str) -> int:
            token = values[column]
            if token not in BINARY_TOKENS:
                raise RecordValueError(f"{column} must be 0 or 1, got {token!r}", row=line, column=column)
            return BINARY_TOKENS[token]

        weight = 1
        if schema.weight:
            token = values[schema.weight]
            if not token.isdigit() or int(token) < 1:
                raise RecordValueError(
                    f"{schema.weight} must be a positive integer, got {token!r}", row=line, column=schema.weight
                )
            weight = int(token)

        return IndividualRecord(
            sensitive=tuple(dim.value(values[dim.name]) for dim in schema.sensitive),
            permissible=tuple(dim.value(values[dim.name]) for dim in schema.permissible),
            outcome=binary(schema.outcome),
            decision=binary(schema.decision),
            weight=weight,
        )

    @staticmethod
    def ingest_json(path: Union[str, Path]) -> Dataset:
        """Read the JSON dataset format: {"schema": {...}, "records": [...]}"""
        path = Path(path)
        if not path.exists():
            raise ParityLensError(f"file not found: {path}")
        text = path.read_text(encoding='utf-8')
        if not text.strip():
            raise EmptyInputError(f"{path} is empty")

        try:
            payload = DatasetFileSchema.model_validate_json(text)
        except ValidationError as e:
            first = e.errors()[0]
            location = '.'.join(str(part) for part in first['loc'])
            raise SchemaError(f"{path}: {location}: {first['msg']}") from None

        if not payload.records:
            raise EmptyInputError(f"{path} holds no records")

        layout = payload.layout
        sensitive_labels = {trait.name: list(trait.values) for trait in layout.sensitive}
        permissible_labels = {trait.name: list(trait.values) for trait in layout.permissible}
        # Values missing from a declared vocabulary are appended in first-appearance order
        for record in payload.records:
            for names, labels, vocabulary in (
                (layout.sensitive, record.sensitive, sensitive_labels),
                (layout.permissible, record.permissible, permissible_labels),
            ):
                if len(labels) != len(names):
                    raise SchemaError(f"{path}: record arity {len(labels)} does not match {len(names)} columns")
                for trait, label in zip(names, labels):
                    if label not in vocabulary[trait.name]:
                        vocabulary[trait.name].append(label)

        schema = DatasetSchema(
            sensitive=tuple(
                TraitDimension.from_labels(name, TraitRole.SENSITIVE, labels)
                for name, labels in sensitive_labels.items()
            ),
            permissible=tuple(
                TraitDimension.from_labels(name, TraitRole.PERMISSIBLE, labels)
                for name, labels in permissible_labels.items()
            ),
            outcome=layout.outcome,
            decision=layout.decision,
            weight=layout.weight,
        )

        records = []
        for index, record in enumerate(payload.records, start=1):
            try:
                records.append(IndividualRecord(
                    sensitive=tuple(dim.value(label) for dim, label in zip(schema.sensitive, record.sensitive)),
                    permissible=tuple(dim.value(label) for dim, label in zip(schema.permissible, record.permissible)),
                    outcome=record.outcome,
                    decision=record.decision,
                    weight=record.weight,
                ))
            except RecordValueError as e:
                raise RecordValueError(e.message, row=index) from None

        dataset = Dataset(schema=schema, records=tuple(records))
        logger.info(f"Ingested {path}: {len(records)} records, n={dataset.n}")
        return dataset

    @staticmethod
    def write_csv(dataset: Dataset, path: Union[str, Path]) -> Path:
        """Write one row per record with a weight column, or expanded unit rows without one"""
        schema = dataset.schema
        rows = []
        for record in dataset.records:
            row = [*record.group, *record.context, str(record.outcome), str(record.decision)]
            if schema.weight:
                rows.append(row + [str(record.weight)])
            else:
                rows.extend([row] * record.weight)

        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        pd.DataFrame(rows, columns=schema.column_names).to_csv(path, index=False, lineterminator='\n')
        logger.info(f"Wrote {len(rows)} rows to {path}")
        return path

    @staticmethod
    def to_file_schema(dataset: Dataset) -> DatasetFileSchema:
        schema = dataset.schema
        layout = DatasetLayoutSchema(
            sensitive=[TraitSchema(name=dim.name, values=list(dim.labels)) for dim in schema.sensitive],
            permissible=[TraitSchema(name=dim.name, values=list(dim.labels)) for dim in schema.permissible],
            outcome=schema.outcome,
            decision=schema.decision,
            weight=schema.weight,
        )
        records = [
            DatasetRecordSchema(
                sensitive=list(record.group),
                permissible=list(record.context),
                outcome=record.outcome,
                decision=record.decision,
                weight=record.weight,
            )
            for record in dataset.records
        ]
        return DatasetFileSchema(layout=layout, records=records)

    @staticmethod
    def write_json(dataset: Dataset, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = DatasetService.to_file_schema(dataset)
        path.write_text(payload.model_dump_json(by_alias=True, indent=2) + '\n', encoding='utf-8')
        return path

    @staticmethod
    def from_cells(schema: DatasetSchema, cells: Iterable[Cell]) -> Dataset:
        """Build a dataset from aggregated cells; zero-count cells are skipped"""
        records = tuple(
            IndividualRecord(
                sensitive=tuple(dim.value(label) for dim, label in zip(schema.sensitive, group)),
                permissible=tuple(dim.value(label) for dim, label in zip(schema.permissible, context)),
                outcome=outcome,
                decision=decision,
                weight=count,
            )
            for group, context, outcome, decision, count in cells
            if count > 0
        )
        if not records:
            raise EmptyInputError("no cell carries a positive count")
        return Dataset(schema=schema, records=records)

    @staticmethod
    def joint_distribution(dataset: Dataset) -> JointDistribution:
        """Empirical exact masses over (a, x, y); record order does not matter"""
        if not dataset.records:
            raise EmptyInputError("dataset holds no records")
        counts = defaultdict(int)
        for record in dataset.records:
            counts[(record.group, record.context, record.outcome)] += record.weight
        n = dataset.n
        masses = {cell: Fraction(count, n) for cell, count in counts.items()}
        return JointDistribution(masses=masses, groups=dataset.groups, contexts=dataset.contexts)

    @staticmethod
    def empirical_algorithm(dataset: Dataset) -> RandomizedAlgorithm:
        """Observed hire frequency P[δ=1 | a, x] for every observed (a, x) cell"""
        totals = defaultdict(int)
        hired = defaultdict(int)
        for record in dataset.records:
            cell = (record.group, record.context)
            totals[cell] += record.weight
            hired[cell] += record.weight * record.decision
        table = {
            (group, context): Fraction(hired[(group, context)], totals[(group, context)])
            for group in dataset.groups
            for context in dataset.contexts
            if (group, context) in totals
        }
        return RandomizedAlgorithm(table=table)
