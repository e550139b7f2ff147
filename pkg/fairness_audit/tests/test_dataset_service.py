import tempfile
from fractions import Fraction
from pathlib import Path

from django.test import SimpleTestCase

from fairness_audit.domain import ColumnRoles, Dataset
from fairness_audit.exceptions import EmptyInputError, RecordValueError, SchemaError
from fairness_audit.services.dataset_service import DatasetService

from . import SAMPLE_DATA

EXAMPLE_ROLES = ColumnRoles(
    sensitive=('gender',),
    permissible=('score',),
    outcome='qualified',
    decision='hired',
)


def _record_keys(dataset: Dataset):
    return [
        (record.group, record.context, record.outcome, record.decision, record.weight)
        for record in dataset.records
    ]


class DatasetIngestionTests(SimpleTestCase):

    def setUp(self):
        workspace = tempfile.TemporaryDirectory()
        self.addCleanup(workspace.cleanup)
        self.workspace = Path(workspace.name)

    def write(self, name: str, text: str) -> Path:
        path = self.workspace / name
        path.write_text(text, encoding='utf-8')
        return path

    def test_worked_example_csv(self):
        dataset = DatasetService.ingest_csv(SAMPLE_DATA / 'optimal_hiring_example.csv', EXAMPLE_ROLES)

        self.assertEqual(dataset.n, 20)
        self.assertEqual(len(dataset.records), 20)
        self.assertEqual(dataset.groups, (('M',), ('F',)))
        self.assertEqual(dataset.schema.sensitive[0].labels, ('M', 'F'))
        self.assertEqual(dataset.schema.permissible[0].labels, ('0', '1'))
        self.assertEqual([value.id for value in dataset.schema.sensitive[0].values], [0, 1])

    def test_json_matches_csv(self):
        from_csv = DatasetService.ingest_csv(SAMPLE_DATA / 'optimal_hiring_example.csv', EXAMPLE_ROLES)
        from_json = DatasetService.ingest(SAMPLE_DATA / 'optimal_hiring_example.json')

        self.assertEqual(from_json.n, 20)
        self.assertEqual(len(from_json.records), 8)
        self.assertEqual(
            DatasetService.joint_distribution(from_json).masses,
            DatasetService.joint_distribution(from_csv).masses,
        )

    def test_csv_requires_roles(self):
        with self.assertRaises(SchemaError):
            DatasetService.ingest(SAMPLE_DATA / 'optimal_hiring_example.csv')

    def test_non_binary_outcome_names_row(self):
        path = self.write('bad.csv', 'a,x,y,delta\nM,0,1,1\nF,1,2,0\n')
        roles = ColumnRoles(sensitive=('a',), permissible=('x',), outcome='y', decision='delta')

        with self.assertRaises(RecordValueError) as caught:
            DatasetService.ingest_csv(path, roles)

        self.assertEqual(caught.exception.row, 3)
        self.assertEqual(caught.exception.column, 'y')
        self.assertIn('row 3', caught.exception.message)

    def test_row_with_extra_field_names_row(self):
        path = self.write('ragged.csv', 'a,x,y,delta\nM,0,1,1\nF,1,0,0,9\n')
        roles = ColumnRoles(sensitive=('a',), permissible=('x',), outcome='y', decision='delta')

        with self.assertRaises(RecordValueError) as caught:
            DatasetService.ingest_csv(path, roles)

        self.assertEqual(caught.exception.row, 3)
        self.assertIn('malformed record', caught.exception.message)

    def test_file_that_is_not_utf8(self):
        path = self.workspace / 'binary.csv'
        path.write_bytes(b'a,y,delta\n\xff\xfe,1,0\n')
        roles = ColumnRoles(sensitive=('a',), outcome='y', decision='delta')

        with self.assertRaises(SchemaError) as caught:
            DatasetService.ingest_csv(path, roles)
        self.assertIn('UTF-8', caught.exception.message)

    def test_missing_column(self):
        path = self.write('short.csv', 'a,x,y\nM,0,1\n')
        roles = ColumnRoles(sensitive=('a',), permissible=('x',), outcome='y', decision='delta')

        with self.assertRaises(SchemaError) as caught:
            DatasetService.ingest_csv(path, roles)
        self.assertIn('delta', caught.exception.message)

    def test_empty_file(self):
        roles = ColumnRoles(sensitive=('a',), outcome='y', decision='delta')

        with self.assertRaises(EmptyInputError):
            DatasetService.ingest_csv(self.write('empty.csv', ''), roles)
        with self.assertRaises(EmptyInputError):
            DatasetService.ingest_csv(self.write('header.csv', 'a,y,delta\n'), roles)

    def test_roles_need_outcome_and_decision(self):
        with self.assertRaises(SchemaError):
            ColumnRoles(sensitive=('a',), decision='delta')
        with self.assertRaises(SchemaError):
            ColumnRoles(sensitive=(), outcome='y', decision='delta')

    def test_column_with_two_roles(self):
        with self.assertRaises(SchemaError):
            ColumnRoles(sensitive=('a',), outcome='y', decision='y')

    def test_ten_rows_two_dimensions(self):
        rows = ['M,0,0,0', 'M,1,1,1', 'F,0,0,0', 'F,1,1,0', 'M,0,1,0',
                'F,0,0,1', 'M,1,0,1', 'F,1,1,1', 'M,1,1,1', 'F,0,1,0']
        path = self.write('ten.csv', 'a,x,y,delta\n' + '\n'.join(rows) + '\n')
        roles = ColumnRoles(sensitive=('a',), permissible=('x',), outcome='y', decision='delta')

        dataset = DatasetService.ingest_csv(path, roles)

        self.assertEqual(dataset.n, 10)
        self.assertEqual(len(dataset.schema.sensitive) + len(dataset.schema.permissible), 2)
        self.assertEqual([record.group for record in dataset.records][:3], [('M',), ('M',), ('F',)])

    def test_no_permissible_traits(self):
        path = self.write('blind.csv', 'a,y,delta\nM,1,1\nF,0,1\n')
        dataset = DatasetService.ingest_csv(path, ColumnRoles(sensitive=('a',), outcome='y', decision='delta'))

        self.assertEqual(dataset.contexts, ((),))
        algorithm = DatasetService.empirical_algorithm(dataset)
        self.assertEqual(algorithm.table, {(('M',), ()): Fraction(1), (('F',), ()): Fraction(1)})

    def test_weight_column(self):
        path = self.write('weighted.csv', 'a,y,delta,count\nM,1,1,3\nF,0,0,2\n')
        roles = ColumnRoles(sensitive=('a',), outcome='y', decision='delta', weight='count')

        dataset = DatasetService.ingest_csv(path, roles)

        self.assertEqual(dataset.n, 5)
        self.assertEqual(DatasetService.joint_distribution(dataset).mass(('M',), (), 1), Fraction(3, 5))

    def test_bad_weight(self):
        path = self.write('weighted.csv', 'a,y,delta,count\nM,1,1,0\n')
        roles = ColumnRoles(sensitive=('a',), outcome='y', decision='delta', weight='count')
        with self.assertRaises(RecordValueError):
            DatasetService.ingest_csv(path, roles)

    def test_json_schema_errors(self):
        path = self.write('broken.json', '{"schema": {"sensitive": []}, "records": []}')
        with self.assertRaises(SchemaError):
            DatasetService.ingest_json(path)

    def test_json_without_records(self):
        path = self.write('none.json', '{"schema": {"sensitive": [{"name": "a"}], "outcome": "y", '
                                       '"decision": "d"}, "records": []}')
        with self.assertRaises(EmptyInputError):
            DatasetService.ingest_json(path)


class DatasetSerializationTests(SimpleTestCase):

    def setUp(self):
        workspace = tempfile.TemporaryDirectory()
        self.addCleanup(workspace.cleanup)
        self.workspace = Path(workspace.name)
        self.dataset = DatasetService.ingest_csv(SAMPLE_DATA / 'optimal_hiring_example.csv', EXAMPLE_ROLES)

    def test_csv_round_trip(self):
        path = DatasetService.write_csv(self.dataset, self.workspace / 'copy.csv')
        again = DatasetService.ingest_csv(path, EXAMPLE_ROLES)

        self.assertEqual(_record_keys(again), _record_keys(self.dataset))

    def test_json_round_trip(self):
        path = DatasetService.write_json(self.dataset, self.workspace / 'copy.json')
        again = DatasetService.ingest_json(path)

        self.assertEqual(_record_keys(again), _record_keys(self.dataset))
        self.assertEqual(again.schema, self.dataset.schema)

    def test_weighted_csv_keeps_one_row_per_record(self):
        weighted = DatasetService.ingest_json(SAMPLE_DATA / 'optimal_hiring_example.json')
        path = DatasetService.write_csv(weighted, self.workspace / 'weighted.csv')

        self.assertEqual(len(path.read_text().splitlines()), 9)
        roles = ColumnRoles(sensitive=('gender',), permissible=('score',), outcome='qualified',
                            decision='hired', weight='count')
        self.assertEqual(_record_keys(DatasetService.ingest_csv(path, roles)), _record_keys(weighted))


class JointDistributionTests(SimpleTestCase):

    def setUp(self):
        self.dataset = DatasetService.ingest_csv(SAMPLE_DATA / 'optimal_hiring_example.csv', EXAMPLE_ROLES)

    def test_worked_example_posteriors(self):
        joint = DatasetService.joint_distribution(self.dataset)

        self.assertEqual(joint.posterior(('M',), ('1',)), Fraction(4, 5))
        self.assertEqual(joint.posterior(('F',), ('1',)), Fraction(3, 5))
        self.assertEqual(joint.posterior(('M',), ('0',)), Fraction(1, 5))
        self.assertEqual(joint.posterior(('F',), ('0',)), Fraction(2, 5))
        self.assertEqual(joint.mass(('M',), ('0',), 0), Fraction(4, 20))

    def test_masses_sum_to_one(self):
        joint = DatasetService.joint_distribution(self.dataset)

        self.assertEqual(joint.total(), 1)
        self.assertTrue(all(mass > 0 for mass in joint.masses.values()))

    def test_record_order_does_not_matter(self):
        shuffled = Dataset(schema=self.dataset.schema, records=tuple(reversed(self.dataset.records)))

        self.assertEqual(
            DatasetService.joint_distribution(shuffled).masses,
            DatasetService.joint_distribution(self.dataset).masses,
        )

    def test_single_record(self):
        single = Dataset(schema=self.dataset.schema, records=self.dataset.records[:1])
        joint = DatasetService.joint_distribution(single)

        self.assertEqual(list(joint.masses.values()), [Fraction(1)])

    def test_empirical_algorithm(self):
        algorithm = DatasetService.empirical_algorithm(self.dataset)

        self.assertEqual(algorithm.hire_probability(('M',), ('1',)), 1)
        self.assertEqual(algorithm.hire_probability(('M',), ('0',)), 0)
        self.assertEqual(algorithm.hire_probability(('F',), ('1',)), 0)
        self.assertEqual(algorithm.hire_probability(('F',), ('0',)), 0)
