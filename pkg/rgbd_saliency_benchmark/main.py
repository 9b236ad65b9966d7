"""sodbench: RGB-D salient object detection benchmark.

Usage:
  sodbench eval [--root=<dir>] [--pred=<dir>] [--gt=<dir>] [--depth=<dir>] [--out=<dir>]
                [--beta-sq=<v>] [--alpha=<v>] [--adaptive-rule=<rule>] [--e-mode=<mode>]
                [--empty-gt=<policy>] [--format=<fmt>] [--workers=<n>] [--seed=<n>] [--config=<path>]
  sodbench gradcheck [--eps=<v>] [--instances=<n>] [--size=<n>] [--zero-inputs]
                     [--workers=<n>] [--seed=<n>] [--config=<path>]
  sodbench demo [--out=<dir>] [--features=<path>] [--depth-map=<path>] [--weights=<path>]
                [--size=<n>] [--seed=<n>] [--config=<path>]
  sodbench selftest [--workers=<n>] [--seed=<n>] [--inject-fault=<name>] [--config=<path>]
  sodbench -h | --help

Options:
  --root=<dir>            Dataset root holding pred/, gt/ and depth/.
  --pred=<dir>            Prediction directory.
  --gt=<dir>              Ground-truth directory.
  --depth=<dir>           Depth directory.
  --out=<dir>             Output directory.
  --beta-sq=<v>           F-measure β² [config default: 0.3].
  --alpha=<v>             S-measure α [config default: 0.5].
  --adaptive-rule=<rule>  twice-mean | mean.
  --e-mode=<mode>         adaptive | max | mean.
  --empty-gt=<policy>     skip | zero.
  --format=<fmt>          table | records.
  --workers=<n>           Worker threads (falls back to SODBENCH_THREADS, then max_workers).
  --seed=<n>              Seed of every stochastic stage [config default: 42].
  --config=<path>         Configuration file, the packaged config.yaml when absent.
  --eps=<v>               Finite-difference step.
  --instances=<n>         Random instances per gradient check.
  --size=<n>              Extent of the random or synthetic maps.
  --zero-inputs           Replace every random gradient-check input by zeros.
  --features=<path>       (C, H, W) feature tensor (.sodt).
  --depth-map=<path>      Depth raster.
  --weights=<path>        Weight bundle manifest.
  --inject-fault=<name>   Mutation checked by the self-test (eq3-sign).

Exit codes: 0 success, 1 check failure, 2 usage, input or configuration error.
"""
import sys

from docopt import DocoptExit, docopt

from rgbd_saliency_benchmark.helpers.config.yaml import default_config_path, read_yaml_config
from rgbd_saliency_benchmark.tasks.base import resolve_workers, setup_logger

# flag -> (section, key, converter)
OVERRIDES = {
    'eval': {
        '--root': ('evaluation', 'dataset_root', str),
        '--pred': ('evaluation', 'pred_dir', str),
        '--gt': ('evaluation', 'gt_dir', str),
        '--depth': ('evaluation', 'depth_dir', str),
        '--out': ('evaluation', 'output_dir', str),
        '--beta-sq': ('evaluation', 'beta_sq', float),
        '--alpha': ('evaluation', 'alpha', float),
        '--adaptive-rule': ('evaluation', 'adaptive_rule', str),
        '--e-mode': ('evaluation', 'e_mode', str),
        '--empty-gt': ('evaluation', 'empty_gt_policy', str),
        '--format': ('evaluation', 'output_format', str),
    },
    'gradcheck': {
        '--eps': ('gradcheck', 'eps', float),
        '--instances': ('gradcheck', 'instances', int),
        '--size': ('gradcheck', 'size', int),
    },
    'demo': {
        '--out': ('demo', 'output_dir', str),
        '--features': ('demo', 'features', str),
        '--depth-map': ('demo', 'depth_map', str),
        '--weights': ('demo', 'weights', str),
        '--size': ('demo', 'size', int),
    },
    'selftest': {
        '--inject-fault': ('selftest', 'inject_fault', str),
    },
}
FORMATS = ('table', 'records')


def build_conf(args, command):
    """
    Configuration file merged with the command-line flags.

    Raises:
        ValueError: A flag value cannot be converted.
    """
    conf = read_yaml_config(args['--config'] or default_config_path())
    for flag, (section, key, convert) in OVERRIDES[command].items():
        if args.get(flag) is None:
            continue
        conf.setdefault(section, {})
        if conf[section] is None:
            conf[section] = {}
        conf[section][key] = convert(args[flag])
    if command == 'gradcheck' and args.get('--zero-inputs'):
        conf.setdefault('gradcheck', {})['zero_inputs'] = True
    if args.get('--seed') is not None:
        conf['seed'] = int(args['--seed'])
    conf['max_workers'] = resolve_workers(args.get('--workers'), conf)
    output_format = (conf.get('evaluation') or {}).get('output_format', 'table')
    if command == 'eval' and output_format not in FORMATS:
        raise ValueError(f"--format must be one of {', '.join(FORMATS)}, got '{output_format}'")
    return conf


def main(argv=None):
    """
    Run one subcommand.

    Returns:
        int: Process exit code.
    """
    try:
        args = docopt(__doc__, argv=argv)
    except DocoptExit as e:
        sys.stderr.write(f"{e}\n")
        return 2

    command = next(name for name in OVERRIDES if args.get(name))
    try:
        conf = build_conf(args, command)
    except (OSError, ValueError) as e:
        setup_logger({}).error(f"Invalid configuration: {e}")
        return 2

    from rgbd_saliency_benchmark.model import AttentionDemo, DatasetEvaluation, GradientCheck, SelfTest

    tasks = {'eval': DatasetEvaluation, 'gradcheck': GradientCheck, 'demo': AttentionDemo, 'selftest': SelfTest}
    return tasks[command](conf).start()


if __name__ == '__main__':
    sys.exit(main())
