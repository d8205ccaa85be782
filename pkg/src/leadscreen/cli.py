"""Command-line entry point: one subcommand per pipeline stage, plus ``all``.

Exit codes: 0 success, 2 unmet precondition or bad input, 3 adapter failure,
4 network or fixture failure.
"""

from __future__ import annotations

import argparse
import shutil
import sys
from importlib import resources
from pathlib import Path

from leadscreen import __version__
from leadscreen.descriptors import compute_all, export_tsv
from leadscreen.errors import AdapterError, ClientError, LeadscreenError, SmilesError
from leadscreen.pipeline import STAGES, Pipeline, load_config
from leadscreen.pipeline.stages import read_smiles_file
from leadscreen.rules import PROFILES
from leadscreen.smiles import parse

EXIT_OK = 0
EXIT_PRECONDITION = 2
EXIT_ADAPTER = 3
EXIT_NETWORK = 4


def exit_code(exc: BaseException) -> int:
    if isinstance(exc, AdapterError):
        return EXIT_ADAPTER
    if isinstance(exc, ClientError) and exc.code != "schema":
        return EXIT_NETWORK
    return EXIT_PRECONDITION


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    # Registered on the top-level parser and on every subcommand so the flags
    # work on either side of the subcommand; SUPPRESS keeps the subparser from
    # clobbering a value given before it.
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", type=Path, default=d, help="YAML run configuration")
    parser.add_argument("--pool", type=Path, default=d, help="pool file (default: <workdir>/pool.jsonl)")
    parser.add_argument("--workdir", type=Path, default=d, help="artifact directory")
    parser.add_argument("--fixtures", type=Path, default=d, help="record/replay fixture directory")
    parser.add_argument("--profile", choices=sorted(PROFILES), default=d, help="selection profile")
    parser.add_argument(
        "--offline", action="store_true", default=argparse.SUPPRESS if suppress else False,
        help="replay fixtures only; never open a connection",
    )


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="leadscreen", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"leadscreen {__version__}")
    _global_flags(ap, suppress=False)
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for stage in STAGES:
        sp = sub.add_parser(stage, help=f"run the {stage} stage")
        _global_flags(sp, suppress=True)
        if stage == "refine-apply":
            sp.add_argument("--round", type=int, default=None, help="round whose flagged candidates are refined")
    sp = sub.add_parser("all", help="run every enabled stage in order")
    _global_flags(sp, suppress=True)
    sp = sub.add_parser("descriptors", help="export descriptors for a SMILES file as TSV")
    _global_flags(sp, suppress=True)
    sp.add_argument("smiles_file", type=Path)
    sp.add_argument("-o", "--output", type=Path, help="write here instead of stdout")
    sp = sub.add_parser("demo", help="copy the bundled offline demo into a directory")
    sp.add_argument("directory", type=Path)
    return ap


def _config(args: argparse.Namespace):
    config_path = args.config
    base = config_path.resolve().parent if config_path else Path.cwd()
    cfg = load_config(config_path, cwd=Path.cwd())
    mode = "replay" if args.offline else None
    fixtures = args.fixtures.resolve() if args.fixtures else None
    cfg = cfg.with_overrides(
        pool=args.pool.resolve() if args.pool else None,
        workdir=args.workdir.resolve() if args.workdir else None,
        profile=args.profile,
        mode=mode,
        fixtures=fixtures,
    )
    if args.offline and (cfg.clients is None or cfg.clients.mode != "replay"):
        raise LeadscreenError(f"--offline needs fixtures (config in {base} has none)")
    return cfg


def _copy_demo(target: Path) -> int:
    if target.exists() and any(target.iterdir()):
        print(f"leadscreen: {target} exists and is not empty", file=sys.stderr)
        return EXIT_PRECONDITION
    src = resources.files("leadscreen") / "demo"
    with resources.as_file(src) as path:
        shutil.copytree(path, target, dirs_exist_ok=True, ignore=shutil.ignore_patterns("__pycache__"))
    print(f"demo copied to {target}; run: leadscreen --config {target / 'config.yaml'} all")
    return EXIT_OK


def _export(args: argparse.Namespace) -> int:
    rows = []
    for smiles in read_smiles_file(args.smiles_file):
        try:
            rows.append((smiles, compute_all(parse(smiles))))
        except SmilesError as exc:
            print(f"leadscreen: skipped {smiles!r}: {exc.code}: {exc}", file=sys.stderr)
    text = export_tsv(rows)
    if args.output:
        args.output.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "demo":
        return _copy_demo(args.directory)
    try:
        if args.command == "descriptors":
            if not args.smiles_file.is_file():
                print(f"leadscreen: no such file {args.smiles_file}", file=sys.stderr)
                return EXIT_PRECONDITION
            return _export(args)
        pipe = Pipeline(_config(args))
        try:
            if args.command == "all":
                pipe.run_all()
            elif args.command == "refine-apply":
                pipe.run("refine-apply", round=args.round)
            else:
                pipe.run(args.command)
        finally:
            pipe.close()
        for note in pipe.notices:
            print(f"note: {note}", file=sys.stderr)
    except LeadscreenError as exc:
        print(f"leadscreen: {exc.code}: {exc}", file=sys.stderr)
        return exit_code(exc)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
