# ==================================================================================
#       Copyright (c) 2026 The stochosc authors.
#
#   Licensed under the Apache License, Version 2.0 (the "License");
#   you may not use this file except in compliance with the License.
#   You may obtain a copy of the License at
#
#          http://www.apache.org/licenses/LICENSE-2.0
#
#   Unless required by applicable law or agreed to in writing, software
#   distributed under the License is distributed on an "AS IS" BASIS,
#   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
#   See the License for the specific language governing permissions and
#   limitations under the License.
# ==================================================================================
"""
stochosc entrypoint
"""
import argparse
import sys
from mdclogpy import Logger
from stochosc import controller


mdc_logger = Logger()
mdc_logger.mdclog_format_init(configmap_monitor=True)


def build_parser():
    parser = argparse.ArgumentParser(prog="stochosc", description="Stochastic two-frequency oscillator ensembles")
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", help="run a preset or config file and write its artifacts")
    simulate.add_argument("source", help="preset name or config file")
    simulate.add_argument("--out", default=None, help="output directory")
    simulate.add_argument("--seed", type=int, default=None, help="master seed override")
    simulate.add_argument("--threads", type=int, default=None, help="worker processes; never changes results")
    simulate.add_argument("--dt", type=float, default=None, help="time step override")
    simulate.add_argument("--n-traj", dest="n_trajectories", type=int, default=None, help="ensemble size override")

    commands.add_parser("presets", help="list presets")

    validate = commands.add_parser("validate", help="parse and validate a config file without running it")
    validate.add_argument("source", help="preset name or config file")
    return parser


def main(argv=None):
    """Entrypoint"""
    args = build_parser().parse_args(argv)
    mdc_logger.debug("stochosc {0}".format(args.command))

    if args.command == "presets":
        rows, code = controller.list_presets()
        for name, description in rows:
            print("{0:8s} {1}".format(name, description))
    elif args.command == "validate":
        manifest, code = controller.validate(args.source)
        if code == controller.EXIT_OK:
            labels = ", ".join(v.label for v in manifest.variants)
            print("ok: {0} variant(s) [{1}], outputs: {2}".format(len(manifest.variants), labels, ", ".join(manifest.outputs)))
        else:
            print(manifest, file=sys.stderr)
    else:
        paths, code = controller.simulate(args.source, args.out, args.seed, args.threads, args.dt, args.n_trajectories)
        if code == controller.EXIT_OK:
            for path in paths:
                print(path)
        else:
            print(paths, file=sys.stderr)
    sys.exit(code)
