"""JSON Schemas for the wire protocol, shared by conformance tests and clients."""

QUESTION_REQUEST = {
    "type": "object",
    "required": ["context", "answer", "beam_width"],
    "additionalProperties": False,
    "properties": {
        "context": {"type": "string"},
        "answer": {"type": "string"},
        "beam_width": {"type": "integer", "minimum": 1},
        "min_len": {"type": "integer", "minimum": 0},
        "max_len": {"type": "integer", "minimum": 0},
    },
}

QUESTION_RESPONSE = {
    "type": "object",
    "required": ["questions"],
    "additionalProperties": False,
    "properties": {
        "questions": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["text", "log_prob"],
                "additionalProperties": False,
                "properties": {
                    "text": {"type": "string", "minLength": 1},
                    "log_prob": {"type": "number", "maximum": 0},
                },
            },
        }
    },
}

ANSWER_REQUEST = {
    "type": "object",
    "required": ["question", "context"],
    "additionalProperties": False,
    "properties": {
        "question": {"type": "string", "minLength": 1},
        "context": {"type": "string"},
    },
}

ANSWER_RESPONSE = {
    "type": "object",
    "required": ["answer", "confidence"],
    "additionalProperties": False,
    "properties": {
        "answer": {
            "oneOf": [
                {"type": "null"},
                {
                    "type": "object",
                    "required": ["text", "start", "end"],
                    "additionalProperties": False,
                    "properties": {
                        "text": {"type": "string"},
                        "start": {"type": "integer", "minimum": 0},
                        "end": {"type": "integer", "minimum": 0},
                    },
                },
            ]
        },
        "confidence": {"type": "number", "minimum": 0, "maximum": 1},
    },
}

HEALTH_RESPONSE = {
    "type": "object",
    "required": ["status", "qg_model", "qa_model"],
    "additionalProperties": False,
    "properties": {
        "status": {"type": "string", "enum": ["ok"]},
        "qg_model": {"type": "string"},
        "qa_model": {"type": "string"},
    },
}

ERROR_RESPONSE = {
    "type": "object",
    "required": ["error"],
    "additionalProperties": False,
    "properties": {"error": {"type": "string"}},
}
