"""
The whole pipeline on a tiny world
==================================

Builds a five-project corpus and a thirty-row posts dump in a temporary
directory, runs every stage, and prints the three tables plus their
large-block versions. The same run is available as

    blockclone run CORPUS Posts.xml -w WORKDIR
"""

import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

import e2e_fixture  # noqa: E402
from blockclone.report import PipelineConfig, run_pipeline  # noqa: E402

with tempfile.TemporaryDirectory() as tmp:
    corpus, dump = e2e_fixture.build(Path(tmp))
    work = Path(tmp) / "work"
    config = PipelineConfig(corpus, dump, work)
    status = run_pipeline(config)
    print("exit status", status)
    print("posts kept", config.stats["posts"]["posts_kept"], "snippets", config.stats["posts"]["snippets"])
    print((work / "report.txt").read_text())
    print(sorted(p.name for p in (work / "scc").iterdir()))
