from .base import MetricsChannel


class ConsoleMetricsChannel(MetricsChannel):
    """Prints each iteration's metrics as a readable block"""

    def __init__(self, label=""):
        self.label = label

    def publish(self, record):
        title = f"ITERATION {record.iteration}" + (f" ({self.label})" if self.label else "")
        print("\n" + "=" * 50)
        print(title)
        print("=" * 50)

        print("\nTRAINING:")
        print(f"  Crashes: {record.training_crashes}")
        print(f"  Laps: {record.laps}")
        print(f"  Planner faults: {record.planner_faults}")
        print(f"  Learner actions: {record.learner_actions}")
        print(f"  Dataset size: {record.dataset_size}")
        print(f"  Training loss: {record.training_loss:.4g}")
        print(f"  Mean KL: {record.mean_kl:.4g} (exceeding bound: {record.kl_exceedance_fraction:.1%})")
        print(f"  Mean teacher cost: {record.mean_teacher_cost:.4g}")

        print("\nEVALUATION:")
        print(f"  MTTF: {record.mttf:.2f} s")
        print(f"  Crash rate: {record.eval_crash_rate:.0%}")
        print(f"  Wall clock: {record.wall_clock:.1f} s")
        print()
