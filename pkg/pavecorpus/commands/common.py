"""Arguments and service construction shared by the manifest-driven commands"""

import argparse
import pathlib

from pavecorpus.genkit.provider import PROVIDER_NAMES
from pavecorpus.repos.manifest import load_manifest
from pavecorpus.services.pipeline_service import PipelineService


def add_manifest_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--manifest", type=pathlib.Path, required=True, help="run manifest (TOML)")
    parser.add_argument("--out", type=pathlib.Path, help="output directory (default: manifest [output] dir)")
    parser.add_argument("--seed", type=int, help="override the manifest seed")
    parser.add_argument("--lenient", action="store_true", help="skip and log bad items instead of failing")


def add_provider_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--provider", choices=PROVIDER_NAMES, help="override the manifest provider")


def pipeline_service(args: argparse.Namespace) -> PipelineService:
    manifest = load_manifest(args.manifest, seed=args.seed)
    return PipelineService(
        manifest,
        lenient=args.lenient,
        provider_name=getattr(args, "provider", None),
        out_dir=args.out,
        show_progress=not getattr(args, "quiet", False),
    )
