// Wire types for the tutoring service API (see docs/api.md in the repo
// root). The client renders these verbatim and never computes pedagogy
// locally.

export type Method = "film" | "dynamic_view" | "game" | "puzzle" | "text";
export type Difficulty = "easy" | "medium" | "hard";
export type KnowledgeLevel = "weak" | "average" | "good" | "very_good" | "excellent";

export interface RuleFiring {
  rule: string;
  because: string;
}

export interface QuestionnaireStep {
  type: "questionnaire";
  scale: { min: number; max: number };
  items: { id: string; prompt: string }[];
}

export interface TestQuestion {
  id: string;
  body: string;
  choices: string[];
  difficulty: Difficulty;
  weight: number;
}

export interface TestStep {
  type: "test";
  phase: "pretest" | "posttest";
  concept_id: string;
  concept_title: string;
  questions: TestQuestion[];
}

export interface PresentationStep {
  type: "presentation";
  concept_id: string;
  concept_title: string;
  method: Method;
  asset: string;
}

export interface CompletedStep {
  type: "completed";
  learner_level: string;
  topics: { id: string; title: string; score: number }[];
}

export type Step = QuestionnaireStep | TestStep | PresentationStep | CompletedStep;

export interface StepEnvelope {
  session_id: string;
  state: string;
  step: Step;
}

export interface SubmitResult {
  // questionnaire results
  dominant_style?: string;
  scores?: Record<string, number>;
  // graded-test results
  phase?: "pretest" | "posttest";
  concept_id?: string;
  score?: number;
  knowledge_level?: KnowledgeLevel;
  decision?: "skip" | "train" | "remediate" | "mastered" | "retrain";
  method?: Method;
  trace?: RuleFiring[];
}

export interface SubmitEnvelope {
  session_id: string;
  state: string;
  result: SubmitResult;
}

export interface RegisterResponse {
  learner_id: string;
  name: string;
  token: string;
  resumed: boolean;
}

export interface SessionResponse {
  session_id: string;
  state: string;
}

export interface ConceptProgress {
  concept_id: string;
  title: string;
  topic_id: string;
  score: number | null;
  knowledge_level: KnowledgeLevel | null;
  attempts: number;
}

export interface ModelView {
  learner_id: string;
  name: string;
  learner_level: string;
  style: { dominant: string; scores: Record<string, number> } | null;
  concepts: ConceptProgress[];
  topics: { id: string; title: string; score: number }[];
}

export interface FaqPayload {
  items: { q: string; a: string }[];
}
