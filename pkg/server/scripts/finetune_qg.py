#!/usr/bin/env python3
"""Fine-tune a seq2seq question-generation checkpoint on answer-conditional data.

Recipe: label-smoothed cross entropy (smoothing 0.1), peak learning rate 2e-5,
100k optimizer steps with 5k warmup; keep the checkpoint with the best
development perplexity. Training examples are built by concatenating the
answer, a marker token, and the source article as the encoder input, with the
question as the decoder target. The marker must match what the server is later
configured with (--answer-marker), since it becomes part of checkpoint
compatibility.

Expects a JSONL dataset of {"article": ..., "question": ..., "answer": ...}.
Not part of CI; requires torch + transformers and a GPU-sized budget.
"""

import argparse
import json


def build_parser():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--base-model", default="facebook/bart-large")
    parser.add_argument("--train", required=True, help="train JSONL")
    parser.add_argument("--dev", required=True, help="dev JSONL")
    parser.add_argument("--output-dir", required=True)
    parser.add_argument("--answer-marker", default="<answer>")
    parser.add_argument("--learning-rate", type=float, default=2e-5)
    parser.add_argument("--label-smoothing", type=float, default=0.1)
    parser.add_argument("--max-steps", type=int, default=100_000)
    parser.add_argument("--warmup-steps", type=int, default=5_000)
    parser.add_argument("--per-device-batch-size", type=int, default=8)
    return parser


def load_examples(path, marker):
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            record = json.loads(line)
            yield {
                "source": f"{record['answer']} {marker} {record['article']}",
                "target": record["question"],
            }


def main() -> int:
    args = build_parser().parse_args()
    try:
        import torch  # noqa: F401
        from transformers import (
            AutoModelForSeq2SeqLM,
            AutoTokenizer,
            DataCollatorForSeq2Seq,
            Seq2SeqTrainer,
            Seq2SeqTrainingArguments,
        )
        from datasets import Dataset
    except ImportError as exc:
        raise SystemExit(f"training extras missing ({exc}); pip install 'qags-model-server[models]' datasets")

    tokenizer = AutoTokenizer.from_pretrained(args.base_model)
    tokenizer.add_special_tokens({"additional_special_tokens": [args.answer_marker]})
    model = AutoModelForSeq2SeqLM.from_pretrained(args.base_model)
    model.resize_token_embeddings(len(tokenizer))

    def encode(example):
        encoded = tokenizer(example["source"], truncation=True, max_length=1024)
        encoded["labels"] = tokenizer(text_target=example["target"], truncation=True, max_length=60)[
            "input_ids"
        ]
        return encoded

    train = Dataset.from_list(list(load_examples(args.train, args.answer_marker))).map(encode)
    dev = Dataset.from_list(list(load_examples(args.dev, args.answer_marker))).map(encode)

    trainer = Seq2SeqTrainer(
        model=model,
        args=Seq2SeqTrainingArguments(
            output_dir=args.output_dir,
            learning_rate=args.learning_rate,
            label_smoothing_factor=args.label_smoothing,
            max_steps=args.max_steps,
            warmup_steps=args.warmup_steps,
            per_device_train_batch_size=args.per_device_batch_size,
            eval_strategy="steps",
            eval_steps=5_000,
            save_strategy="steps",
            save_steps=5_000,
            load_best_model_at_end=True,
            metric_for_best_model="eval_loss",
            greater_is_better=False,
        ),
        train_dataset=train,
        eval_dataset=dev,
        data_collator=DataCollatorForSeq2Seq(tokenizer, model=model),
    )
    trainer.train()
    trainer.save_model(args.output_dir)
    tokenizer.save_pretrained(args.output_dir)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
