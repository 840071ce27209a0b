# Example of training an EVQKAN network and the QNN baseline on the fitting task.

import logging
from dataclasses import replace

import python_evqkan.harness as harness
from python_evqkan.optimizer import OptimizerConfig
from python_evqkan.tasks import TaskSpec

logging.basicConfig(level=logging.INFO)

# Small run: 3 attempts with a reduced evaluation budget
base = harness.ExperimentConfig(task=TaskSpec(kind='fit', target_id='eq7'), attempts=3,
                                optimizer=OptimizerConfig(max_evaluations=400))

for method in ['evqkan', 'qnn']:
    config = replace(base, method=method)
    # Every run writes into its own timestamped directory
    config = replace(config, output_dir=harness.make_run_directory('results', config))

    records = harness.run_experiment(config)
    stats = harness.summarize(records)
    harness.emit_reports(records, stats, config, config.output_dir)
    harness.print_summary_table(stats, title=f"{method} on eq7")

# Layer sweep for the transposed ansatz on the classification task
sweep_config = replace(base, task=TaskSpec(kind='classify', target_id='boundary'), transposed=True, attempts=2,
                       optimizer=OptimizerConfig(max_evaluations=300))
sweep_config = replace(sweep_config, output_dir=harness.make_run_directory('results', sweep_config))
print(harness.layer_sweep(sweep_config, [1, 2, 3]).to_string(index=False))
