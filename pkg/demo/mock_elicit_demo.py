#!/usr/bin/env python3
"""Mock Elicitation Demo.

Runs the cakes scenario against the scripted chat server so the elicitation
path can be tried without an API key:
1. Load a JSON reply script (two rate-limit errors, then an answer of 2t)
2. Query every t in the scenario grid through the OpenAI client
3. Persist the records and run manifest to demo_output/runs
4. Fit the elicited predictions

Set PRIOR_LENS_API_KEY in .env and drop the mock to query a real endpoint.
"""

import asyncio
import logging
import sys
from pathlib import Path

# Add the src directory to Python path to allow imports without installing
project_root = Path(__file__).parent.parent
sys.path.append(str(project_root / "src"))

# Load environment variables from .env file
from dotenv import load_dotenv
load_dotenv()

from prior_lens.elicitation import BUILTIN_SCENARIOS, ClientConfig, Elicitor, ScriptedChatServer
from prior_lens.fitting import select_model
from prior_lens.store import build_manifest, read_pairs, write_records

SCRIPT = project_root / "tests" / "data" / "scripts" / "cakes_429_then_ok.json"


async def run():
    scenario = BUILTIN_SCENARIOS["cakes"]
    config = ClientConfig(model_id="mock-model", retry_base_delay=0.05)
    server = ScriptedChatServer.from_file(SCRIPT)
    elicitor = Elicitor(config, client=server.client("demo-key"))

    records = await elicitor.run(scenario)
    print(f"{len(records)} records, {elicitor.retries} retries")

    manifest = build_manifest(scenario, config, replicates=1)
    _, records_path = write_records(manifest, records, project_root / "demo_output" / "runs")
    print(f"records written to {records_path}")

    ranking = select_model(read_pairs(records_path).pairs)
    print(f"winner: {ranking.best.family} {ranking.best.params}")


if __name__ == "__main__":
    logging.basicConfig(level=logging.INFO, format="%(name)s - %(levelname)s - %(message)s")
    asyncio.run(run())
