"""Experiment harness: configs, scenario composition, runner, metrics, CLI.

Submodules are imported explicitly (``treobench.bench.runner`` etc.); this
package root stays empty so that lower layers can import ``bench.metrics``
without dragging in the CLI.
"""
