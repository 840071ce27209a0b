"""Long training runs checking the benchmark orderings.

These runs take several minutes each and are skipped unless the environment
variable EVQKAN_REPRODUCTION is set to 1.
"""

import os
import unittest
from dataclasses import replace

import python_evqkan.harness as harness
import python_evqkan.tasks as tasks

REPRODUCTION = os.environ.get('EVQKAN_REPRODUCTION') == '1'

CLASSIFY = tasks.TaskSpec(kind='classify', target_id='boundary')


def mean_total(config):
    return harness.summarize(harness.run_experiment(config)).average


@unittest.skipUnless(REPRODUCTION, "set EVQKAN_REPRODUCTION=1 to run the reproduction checks")
class TestFitting(unittest.TestCase):

    def test_evqkan_beats_qnn(self):
        evqkan = mean_total(harness.apply_paper_mode(harness.ExperimentConfig(method='evqkan')))
        qnn = mean_total(harness.apply_paper_mode(harness.ExperimentConfig(method='qnn')))
        self.assertLess(evqkan, qnn)
        self.assertTrue(10 <= evqkan <= 22, evqkan)

    def test_more_layers_help(self):
        base = harness.apply_paper_mode(harness.ExperimentConfig(method='evqkan'))
        self.assertLess(mean_total(replace(base, num_layers=3)), mean_total(replace(base, num_layers=1)))


@unittest.skipUnless(REPRODUCTION, "set EVQKAN_REPRODUCTION=1 to run the reproduction checks")
class TestClassification(unittest.TestCase):

    def test_evqkan_band(self):
        average = mean_total(harness.apply_paper_mode(harness.ExperimentConfig(method='evqkan', task=CLASSIFY)))
        self.assertTrue(15 <= average <= 42, average)

    def test_transposed_single_layer(self):
        conventional = harness.apply_paper_mode(harness.ExperimentConfig(task=CLASSIFY, num_layers=1))
        transposed = harness.apply_paper_mode(harness.ExperimentConfig(task=CLASSIFY, num_layers=1,
                                                                       transposed=True))
        self.assertLess(mean_total(transposed), mean_total(conventional))


@unittest.skipUnless(REPRODUCTION, "set EVQKAN_REPRODUCTION=1 to run the reproduction checks")
class TestDeterminism(unittest.TestCase):

    def test_paper_mode_records_repeat(self):
        config = harness.apply_paper_mode(harness.ExperimentConfig(method='qnn', workers=4))
        first = [record.to_dict() for record in harness.run_experiment(config)]
        second = [record.to_dict() for record in harness.run_experiment(config)]
        for data in first + second:
            data.pop('elapsed_seconds')
        self.assertEqual(first, second)


if __name__ == '__main__':
    unittest.main()
