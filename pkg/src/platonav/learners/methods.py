"""
Reset-free training loops.

All methods share one loop and differ only in which distribution is executed
and which labels the dataset:

    method       executes                      labels
    plato        π_λ                           π*
    dagger       β_i π* + (1 - β_i) π_θ        π*
    coaching     β_i π* + (1 - β_i) π_θ        π_λ
    supervised   π*                            π*

Mixing is decided per step by a Bernoulli(β_i) draw. Only dagger and
coaching ever execute the learner.
"""

import logging

import numpy as np

from ..env.cost import TaskCostModel, normalized_cost
from ..env.obstacles import crash_check
from ..env.sensors.factory import observation_dim, observe
from ..env.vehicle import CONTROL_DIM, VehicleDynamics, hover_control, step
from ..env.worlds import build_field, respawn
from ..errors import ContractViolation, NumericalError, SimulationDiverged
from ..gaussian import Gaussian, kl_divergence, sample
from ..policy.dataset import DemoDataset
from ..policy.network import GaussianMlpPolicy
from ..policy.training import fit_policy_covariance, train_policy
from ..trajopt.mpc import mpc_star_plan, mpc_teacher_plan
from .commands import VelocityCommander
from .run_state import ActionSource, IterationStats, RunStreams, TrainingRunState, derived_seed, summarize
from .schedule import BetaSchedule, beta_value

logger = logging.getLogger("PlatoNav.learners")

METHODS = ("plato", "dagger", "coaching", "supervised")
WORLD_SEED_TAG = 1


def world_seed(seed, phase_index):
    return derived_seed(seed, WORLD_SEED_TAG, phase_index)


def initial_policy(config, rng):
    input_dim = observation_dim(config.sensor, with_command=config.commands.enabled)
    return GaussianMlpPolicy.initialize(
        input_dim, CONTROL_DIM, config.policy.hidden_sizes, rng=rng,
        initial_variance=config.policy.initial_variance,
    )


class _Planner:
    """Per-step planning for one method, keeping the warm starts between steps"""

    def __init__(self, method, dynamics, mpc_config):
        self.method = method
        self.dynamics = dynamics
        self.mpc = mpc_config
        self.reset()

    def reset(self):
        self.teacher_warm = None
        self.star_warm = None

    def plan(self, x, observation, policy, cost_model):
        """(teacher PlanResult or None, star PlanResult)"""
        teacher = None
        if self.method in ("plato", "coaching"):
            teacher = mpc_teacher_plan(x, observation, policy, self.dynamics, cost_model, self.mpc,
                                       warm_start=self.teacher_warm)
        if teacher is not None and self.mpc.kl_weight == 0.0:
            star = teacher
        else:
            star = mpc_star_plan(x, self.dynamics, cost_model, self.mpc, warm_start=self.star_warm)
        return teacher, star

    def advance(self, teacher, star):
        self.teacher_warm = teacher.controller.shifted(self.dynamics) if teacher is not None else None
        self.star_warm = star.controller.shifted(self.dynamics)


def run_training(config, method, schedule=None, callbacks=()):
    """
    Run N iterations of T reset-free steps of one method.

    Args:
        config: ExperimentConfig
        method: One of METHODS
        schedule: BetaSchedule for dagger and coaching
        callbacks: Callables (state, summary) invoked after each iteration

    Returns:
        TrainingRunState with history, provenance log and final policy
    """
    if method not in METHODS:
        raise ContractViolation(f"unknown method '{method}'")
    mixing = method in ("dagger", "coaching")
    if mixing and schedule is None:
        schedule = BetaSchedule(config.schedule, max(config.iterations, 1))

    streams = RunStreams(config.seed)
    state = TrainingRunState(initial_policy(config, streams.init), DemoDataset(), streams)
    for callback in callbacks:
        state.register_iteration_callback(callback)

    dynamics = VehicleDynamics(config.vehicle, epsilon=config.mpc.fd_epsilon)
    planner = _Planner(method, dynamics, config.mpc)
    commander = VelocityCommander(config.commands, streams.commands) if config.commands.enabled else None
    clearance = 2.0 * config.cost.d_safe
    field, phase = None, None

    for iteration in range(1, config.iterations + 1):
        state.iteration = iteration
        if field is None or config.world.phase_index(iteration) != phase:
            phase = config.world.phase_index(iteration)
            generator = config.world.generator_for_iteration(iteration)
            field = build_field(config.world, generator, world_seed(config.seed, phase), config.vehicle.radius)
            vehicle = respawn(field, streams.respawn, clearance)
            planner.reset()
            logger.info(f"Iteration {iteration}: world '{generator}' (phase {phase})")
        beta = beta_value(schedule, iteration) if mixing else None
        stats = IterationStats()

        for t in range(config.steps_per_iteration):
            command = commander.update(vehicle) if commander is not None else None
            task_cost = config.cost.with_command(command) if command is not None else config.cost
            cost_model = TaskCostModel(task_cost, field)
            observation = observe(field, vehicle, config.sensor, streams.observation, command)
            use_supervisor = streams.mixing.random() < beta if mixing else None
            queries = 0

            try:
                teacher, star = planner.plan(vehicle.to_vector(), observation, state.policy, cost_model)
            except NumericalError as e:
                logger.warning(f"Planner fault at iteration {iteration}, step {t}: {e}")
                stats.planner_faults += 1
                distribution = _fallback_distribution(planner, vehicle)
                u = sample(distribution, streams.action)
                planner.reset()
                state.record_step(t, ActionSource.FALLBACK, None, 0)
            else:
                if teacher is not None and config.mpc.kl_weight != 0.0:
                    queries += 1
                if method == "plato":
                    learner_action = state.policy.forward(observation)
                    queries += 1
                    stats.kl_samples.append(kl_divergence(teacher.action, learner_action))
                    executed, source, plan_cost = teacher.action, ActionSource.TEACHER, teacher.cost
                elif method == "supervised" or use_supervisor:
                    executed, source, plan_cost = star.action, ActionSource.SUPERVISOR, star.cost
                else:
                    executed, source, plan_cost = state.policy.forward(observation), ActionSource.LEARNER, None
                    queries += 1
                    stats.learner_actions += 1
                if method == "coaching" and teacher is not None:
                    stats.kl_samples.append(kl_divergence(teacher.action, state.policy.forward(observation)))
                    queries += 1
                if plan_cost is not None:
                    stats.teacher_costs.append(plan_cost)

                label, label_source = (
                    (teacher.action, ActionSource.TEACHER) if method == "coaching"
                    else (star.action, ActionSource.SUPERVISOR)
                )
                u = sample(executed, streams.action)
                state.dataset.append(observation, label, sample(label, streams.label), iteration)
                planner.advance(teacher, star)
                state.record_step(t, source, label_source, queries)
            stats.learner_queries += queries
            stats.normalized_costs.append(normalized_cost(task_cost, field, vehicle, u))
            stats.steps += 1

            try:
                vehicle = step(vehicle, u, config.vehicle.dt, config.vehicle.control_noise,
                               streams.dynamics, config.vehicle)
            except SimulationDiverged as e:
                logger.error(f"Simulation diverged at iteration {iteration}, step {t}: {e}")
                stats.training_crashes += 1
                vehicle = respawn(field, streams.respawn, clearance)
                planner.reset()
                continue
            if crash_check(field, vehicle, config.vehicle.radius):
                stats.training_crashes += 1
                logger.debug(f"Crash at iteration {iteration}, step {t}; respawning")
                vehicle = respawn(field, streams.respawn, clearance)
                planner.reset()
            elif field.out_of_course(vehicle.position):
                stats.laps += 1
                vehicle = respawn(field, streams.respawn, clearance)
                planner.reset()

        loss = float("nan")
        if len(state.dataset):
            loss = train_policy(state.policy, state.dataset, config.training, streams.training).loss
            if not config.policy.fixed_covariance:
                state.policy.set_covariance(fit_policy_covariance(state.dataset))
        state.finish_iteration(summarize(iteration, stats, len(state.dataset), loss, config.kl_bound))
    return state


def _fallback_distribution(planner, vehicle):
    """Previous executing plan shifted one step, or hover with unit covariance"""
    previous = planner.teacher_warm or planner.star_warm
    if previous is not None:
        try:
            return previous.action_distribution(0, vehicle.to_vector())
        except NumericalError:
            pass
    return Gaussian(hover_control(), np.eye(CONTROL_DIM))


def run_plato(config, callbacks=()):
    """PLATO: execute the KL-penalized teacher, label with the supervisor"""
    return run_training(config, "plato", callbacks=callbacks)


def run_dagger(config, schedule=None, callbacks=()):
    """DAgger: execute the β-mixture of supervisor and learner, label with the supervisor"""
    return run_training(config, "dagger", schedule, callbacks)


def run_coaching(config, schedule=None, callbacks=()):
    """DAgger with coaching: execute the β-mixture, label with the teacher"""
    return run_training(config, "coaching", schedule, callbacks)


def run_supervised(config, callbacks=()):
    """Supervised learning: execute and label with the supervisor"""
    return run_training(config, "supervised", callbacks=callbacks)
